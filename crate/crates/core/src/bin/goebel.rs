fn main() {
    std::process::exit(goebel::cli::run(std::env::args_os()));
}
