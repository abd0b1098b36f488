"""Stand-in SMT solver: prints $FAKE_SMT_REPLY, or 'unsat'/'sat' by script content."""

import os
import sys

script = open(sys.argv[1], encoding="utf-8").read()
reply = os.environ.get("FAKE_SMT_REPLY")
if reply is None:
    reply = "sat\n" if "(assert true)" in script else "unsat\n"
sys.stdout.write(reply.replace("\\n", "\n"))
sys.exit(int(os.environ.get("FAKE_SMT_EXIT", "0")))
