from docutils.nodes import (
    Text, emphasis, field, field_body, field_list, field_name, literal,
    paragraph)
from docutils.parsers.rst import Directive

from confmodel.config import ConfigField

from pulsevo.config import SECTIONS, RunConfig


class ConfModelDirective(Directive):
    '''Lists the fields of a run config section, ``.. confmodel:: ga``, or
    of the top level run config without an argument.'''
    optional_arguments = 1

    def run(self):
        section = self.arguments[0] if self.arguments else None
        cls = SECTIONS[section] if section is not None else RunConfig
        fields = field_list()
        for name, props in config_fields(cls):
            fields += describe(name, props)
        return [fields]


def config_fields(cls):
    return [
        (name, props) for name, props in vars(cls).items()
        if isinstance(props, ConfigField)]


def describe(name, props):
    summary = paragraph()
    summary += emphasis(text=props.field_type)
    summary += Text(', default ')
    summary += literal(text=repr(props.default))
    body = field_body()
    body += paragraph(text=props.doc)
    body += summary
    node = field()
    node += field_name(text=name)
    node += body
    return node


def setup(app):
    app.add_directive('confmodel', ConfModelDirective)
