fn main() {
    std::process::exit(exactsearch::cli::run(std::env::args_os()));
}
