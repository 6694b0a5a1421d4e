fn main() {
    std::process::exit(tachyon_cli::main_with_args(std::env::args_os()));
}
