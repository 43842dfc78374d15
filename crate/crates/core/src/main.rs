fn main() {
    std::process::exit(relay_capacity::cli::run(std::env::args_os()));
}
