fn main() {
    std::process::exit(sgtopo::run(std::env::args_os()));
}
