fn main() {
    std::process::exit(inarao_cli::app::main_with(std::env::args_os()));
}
