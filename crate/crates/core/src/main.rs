fn main() {
    std::process::exit(sicpovm::cli::run(std::env::args_os()));
}
