fn main() {
    std::process::exit(nbp::cli::run(std::env::args_os()));
}
