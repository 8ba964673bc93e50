fn main() {
    std::process::exit(im_oracle::cli::main_with_args(std::env::args_os()));
}
