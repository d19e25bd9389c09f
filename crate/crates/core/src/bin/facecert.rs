fn main() {
    std::process::exit(simplicial_faces::cli::main_with_args(std::env::args_os()));
}
