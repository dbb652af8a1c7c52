fn main() {
    std::process::exit(chromalex::cli::run(std::env::args_os()));
}
