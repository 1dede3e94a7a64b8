fn main() {
    std::process::exit(pramana::cli::run(std::env::args_os()));
}
