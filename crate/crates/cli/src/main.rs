fn main() {
    std::process::exit(frameforge_cli::run_from(std::env::args_os()));
}
