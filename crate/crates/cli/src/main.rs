fn main() {
    std::process::exit(lw6_cli::cli_main(std::env::args_os()));
}
