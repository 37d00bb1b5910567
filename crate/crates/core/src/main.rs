fn main() {
    std::process::exit(horolab::cli::main_with_args(std::env::args_os()));
}
