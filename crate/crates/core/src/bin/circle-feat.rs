fn main() {
    std::process::exit(circle_feat::cli::run_cli(std::env::args_os()));
}
