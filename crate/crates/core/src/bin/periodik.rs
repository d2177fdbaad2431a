fn main() {
    std::process::exit(periodik::cli::run(std::env::args_os()));
}
