fn main() {
    std::process::exit(symlatent::cli::run(std::env::args_os()));
}
