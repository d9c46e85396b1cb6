fn main() {
    std::process::exit(xsep::cli::run(std::env::args_os()));
}
