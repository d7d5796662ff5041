fn main() {
    std::process::exit(testprio::cli::run(std::env::args_os()));
}
