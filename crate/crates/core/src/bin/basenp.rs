fn main() {
    std::process::exit(basenp::cli::run(std::env::args_os()));
}
