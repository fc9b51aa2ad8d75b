fn main() {
    std::process::exit(seisfuzz_cli::run(std::env::args_os()));
}
