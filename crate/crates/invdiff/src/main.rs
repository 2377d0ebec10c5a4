fn main() {
    std::process::exit(invdiff::cli::run(std::env::args_os()));
}
