fn main() {
    std::process::exit(meanforge::cli::run(std::env::args_os()));
}
