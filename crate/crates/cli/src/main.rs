fn main() {
    std::process::exit(sqzkit::run(std::env::args_os()));
}
