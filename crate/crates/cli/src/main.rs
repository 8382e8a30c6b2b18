fn main() {
    std::process::exit(nyqmirror_cli::run(std::env::args_os()));
}
