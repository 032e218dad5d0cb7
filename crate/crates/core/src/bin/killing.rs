fn main() {
    std::process::exit(killing::cli::run(std::env::args_os()));
}
