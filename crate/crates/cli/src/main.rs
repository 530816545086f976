fn main() {
    std::process::exit(qplab_cli::run(std::env::args_os()));
}
