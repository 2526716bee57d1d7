fn main() {
    std::process::exit(fblab::cli::main_with(std::env::args_os()));
}
