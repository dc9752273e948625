from jinja2 import Environment, PackageLoader, select_autoescape

env = Environment(
    loader=PackageLoader("blowuplab"),
    autoescape=select_autoescape(enabled_extensions=("html.j2", "svg.j2")),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def render(template: str, **context) -> str:
    return env.get_template(template).render(**context)
