fn main() {
    std::process::exit(snapcx::cli::run(std::env::args_os()));
}
