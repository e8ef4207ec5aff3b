fn main() {
    std::process::exit(retire_cli::run(std::env::args_os()));
}
