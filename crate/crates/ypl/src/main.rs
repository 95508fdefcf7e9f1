fn main() {
    std::process::exit(ypl::cli::run(std::env::args_os()));
}
