fn main() {
    let out = hermdens_cli::execute(std::env::args_os());
    if out.diagnostic {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    std::process::exit(out.code);
}
