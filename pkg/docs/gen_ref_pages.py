"""Build the API reference pages for every public edudyn module."""

from pathlib import Path

import mkdocs_gen_files

root = Path(__file__).parent.parent
package = root / "edudyn"
nav = mkdocs_gen_files.Nav()

for source in sorted(package.rglob("*.py")):
    dotted = source.relative_to(root).with_suffix("").parts
    page = Path(*dotted).with_suffix(".md")

    if dotted[-1] == "__main__":
        continue
    if dotted[-1] == "__init__":
        dotted = dotted[:-1]
        page = page.with_name("index.md")

    nav[dotted] = page.as_posix()
    with mkdocs_gen_files.open(Path("reference", page), "w") as handle:
        ident = ".".join(dotted)
        handle.write(f"# `{ident}`\n\n::: {ident}\n    options:\n      show_root_heading: false\n")
    mkdocs_gen_files.set_edit_path(Path("reference", page), source.relative_to(root))

with mkdocs_gen_files.open("reference/SUMMARY.md", "w") as summary:
    summary.writelines(nav.build_literate_nav())
