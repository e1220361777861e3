fn main() {
    std::process::exit(surfdenoise::cli::run(std::env::args_os()));
}
