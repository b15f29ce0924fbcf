fn main() {
    std::process::exit(abcest::cli::run(std::env::args_os()));
}
