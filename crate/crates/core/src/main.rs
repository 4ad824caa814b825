fn main() {
    std::process::exit(v2x_beam::cli::run(std::env::args_os()));
}
