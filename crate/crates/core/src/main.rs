fn main() {
    std::process::exit(epilab::cli::run(std::env::args_os()));
}
