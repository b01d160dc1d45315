fn main() {
    std::process::exit(bos::run(std::env::args_os()));
}
