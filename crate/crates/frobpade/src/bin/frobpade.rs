fn main() {
    std::process::exit(frobpade::cli::run(std::env::args_os()));
}
