fn main() {
    std::process::exit(qdc::run(std::env::args_os()));
}
