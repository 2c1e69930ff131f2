fn main() {
    std::process::exit(susyflow_cli::main_with(std::env::args_os()));
}
