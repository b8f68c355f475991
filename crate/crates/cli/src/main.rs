use std::io;

fn main() {
    let (stdin, stdout, stderr) = (io::stdin(), io::stdout(), io::stderr());
    let mut io = methagg::Io { stdin: &mut stdin.lock(), stdout: &mut stdout.lock(), stderr: &mut stderr.lock() };
    let code = methagg::run(std::env::args_os(), &mut io);
    std::process::exit(code);
}
