fn main() {
    std::process::exit(spca::cli::run(std::env::args_os()));
}
