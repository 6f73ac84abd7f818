fn main() {
    std::process::exit(splitlab_cli::run(std::env::args_os()));
}
