fn main() {
    std::process::exit(unigui_core::cli::run_cli(std::env::args_os()));
}
