fn main() {
    std::process::exit(pargrowth_cli::commands::main_with(std::env::args_os()));
}
