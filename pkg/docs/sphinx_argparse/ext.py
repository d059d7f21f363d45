from argparse import _HelpAction, _SubParsersAction

from docutils.nodes import (
    paragraph, section, literal_block, title, description,
    option, option_list, option_list_item, option_group, option_string)
from docutils.parsers.rst import Directive
from docutils.parsers.rst.directives import unchanged


class ArgParseDirective(Directive):
    """
    Documents an argparse parser with one section per subcommand. Only the
    subset of sphinx-argparse that the command line reference needs.
    """
    has_content = True

    option_spec = {
        'module': unchanged,
        'func': unchanged,
        'prog': unchanged,
    }

    def run(self):
        parser = load_function(self.options['module'], self.options['func'])()
        parser.prog = self.options['prog']

        return [
            el(paragraph, text=parser.description),
            el(literal_block, text=parser.format_usage()),
        ] + [
            command_section(name, subparser)
            for name, subparser in get_subcommands(parser)
        ]


def command_section(name, parser):
    return el(section, [
        el(title, text=name),
        el(literal_block, text=parser.format_usage()),
        el(option_list, [
            el(option_list_item, [
                el(option_group, [
                    el(option, [
                        el(option_string, text=arg),
                    ])
                    for arg in arguments
                ]),
                el(description, [
                    el(paragraph, text=descrip),
                ])
            ])
            for descrip, arguments in get_options(parser)
        ]),
    ], ids=['command-%s' % name], names=[name])


def get_subcommands(parser):
    # argparse keeps subparsers on a private action, sphinx-argparse reads
    # them the same way.
    for action in parser._actions:
        if isinstance(action, _SubParsersAction):
            return sorted(action.choices.items())
    return []


def get_options(parser):
    options = []
    for action in parser._actions:
        if isinstance(action, _HelpAction):
            continue

        help_string = action.help or None
        options.append((help_string, action.option_strings or [action.dest]))
    return options


def el(cls, children=None, **kw):
    element = cls(**kw)
    element += children if children is not None else []
    return element


def load_function(module_path, function_name):
    return getattr(
        __import__(module_path, fromlist=[function_name]),
        function_name)


def setup(app):
    app.add_directive('argparse', ArgParseDirective)
