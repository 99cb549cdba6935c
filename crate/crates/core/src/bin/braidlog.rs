fn main() {
    std::process::exit(braidlog::cli::run(std::env::args_os()));
}
