fn main() {
    std::process::exit(gaitframe::cli::run(std::env::args_os()));
}
