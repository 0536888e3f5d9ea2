fn main() {
    std::process::exit(lcx::cli::run(std::env::args_os()));
}
