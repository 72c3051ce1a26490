fn main() {
    std::process::exit(gcalabi::cli::main_with_args(std::env::args_os()));
}
