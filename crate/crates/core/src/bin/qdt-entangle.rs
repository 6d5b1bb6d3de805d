fn main() {
    std::process::exit(qdt_core::cli::run(std::env::args_os()));
}
