fn main() {
    std::process::exit(qwalk_core::cli::run(std::env::args_os()));
}
