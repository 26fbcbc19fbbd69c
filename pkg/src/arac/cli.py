"""Command line entry points.

    arac serve --config conf.json          start the HTTP service
    arac export corpus.zip --storage db    write a corpus archive
    arac import corpus.zip --storage db    merge a corpus archive
    arac annotate text.txt taxonomy.txt    offline annotation, JSON lines
    arac report --storage db --student s1  history CSV + performance chart
"""
from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from .archive import export_corpus, import_corpus
from .config import load_config
from .corpus import decode_text_upload, find_taxonomy_matches, parse_taxonomy_file
from .errors import AracError, InvalidTaxonomyEntry
from .normalization import NormalizationConfig
from .reporting import generate_performance_report, resolve_student
from .store import EntityStore
from .tokenizer import tokenize


def _fail(exc: AracError) -> click.ClickException:
    return click.ClickException(f"{exc.code}: {exc.message}")


@click.group()
def main():
    """ARAC: pedagogically indexed Arabic text base and activity platform."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file")
@click.option("--host", default=None, help="Override bind host")
@click.option("--port", type=int, default=None, help="Override bind port")
@click.option("--storage", default=None, type=click.Path(), help="Override storage path")
def serve(config_path, host, port, storage):
    """Run the HTTP service."""
    from .api import serve as run_service

    try:
        config = load_config(config_path)
        if host is not None:
            config = dataclasses.replace(config, bind_host=host)
        if port is not None:
            config = dataclasses.replace(config, bind_port=port)
        if storage is not None:
            config = dataclasses.replace(config, storage_path=storage)
        run_service(config)
    except AracError as exc:
        raise _fail(exc)


@main.command("export")
@click.argument("archive", type=click.Path())
@click.option("--storage", required=True, type=click.Path(exists=True), help="Storage snapshot to export")
def export_cmd(archive, storage):
    """Export the whole corpus into a versioned archive."""
    try:
        store = EntityStore(storage)
        path = export_corpus(store, archive)
    except AracError as exc:
        raise _fail(exc)
    counts = {kind: store.count(kind) for kind in ("texts", "themes", "taxonomies")}
    click.echo(f"exported {counts['texts']} texts ({counts['themes']} themes, "
               f"{counts['taxonomies']} taxonomies) to {path}")


@main.command("import")
@click.argument("archive", type=click.Path(exists=True))
@click.option("--storage", required=True, type=click.Path(), help="Storage snapshot to import into")
def import_cmd(archive, storage):
    """Merge a corpus archive into a store; conflicts are reported, never overwritten."""
    try:
        store = EntityStore(storage)
        report = import_corpus(store, archive)
    except AracError as exc:
        raise _fail(exc)
    counts = report.counts()
    click.echo(f"created {counts['created']}, skipped {counts['skipped']}, "
               f"conflicts {counts['conflicts']}")
    for kind, ids in sorted(report.conflicts.items()):
        for entity_id in ids:
            click.echo(f"conflict: {kind} {entity_id}", err=True)


@main.command()
@click.argument("text_file", type=click.Path(exists=True))
@click.argument("taxonomy_file", type=click.Path(exists=True))
@click.option("--strip-diacritics", is_flag=True, default=False)
@click.option("--strip-tatweel", is_flag=True, default=False)
def annotate(text_file, taxonomy_file, strip_diacritics, strip_tatweel):
    """Offline annotation run: print matches as JSON lines."""
    config = NormalizationConfig(strip_diacritics=strip_diacritics, strip_tatweel=strip_tatweel)
    try:
        body = decode_text_upload(Path(text_file).read_bytes())
        entries = parse_taxonomy_file(Path(taxonomy_file).read_bytes())
        for entry in entries:
            if len(tokenize(entry)) != 1:
                raise InvalidTaxonomyEntry(f"taxonomy entry {entry!r} is not a single token")
        tokens = tokenize(body)
        matches = find_taxonomy_matches(tokens, entries, config)
    except AracError as exc:
        raise _fail(exc)
    for j, i in sorted(matches, key=lambda m: (m[1], m[0])):
        token = tokens[i]
        line = {
            "token_index": i,
            "surface": token.surface,
            "byte_span": [token.start, token.end],
            "entry_index": j,
            "entry": entries[j],
            "source": "automatic",
        }
        sys.stdout.write(json.dumps(line, ensure_ascii=False) + "\n")


@main.command()
@click.option("--storage", required=True, type=click.Path(exists=True), help="Storage snapshot to read")
@click.option("--student", required=True, help="Student id or login")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory")
def report(storage, student, out_dir):
    """Write a student's performance history as CSV plus a chart image."""
    from .accounts import AccountService

    try:
        store = EntityStore(storage)
        target = resolve_student(store, student)
        accounts = AccountService(store)
        history = accounts.performance_history(target.id, caller=target)
        paths = generate_performance_report(
            store, history, out_dir, label=f"performance history: {target.login}"
        )
    except AracError as exc:
        raise _fail(exc)
    click.echo(f"wrote {paths['csv']} and {paths['chart']} ({len(history.entries)} entries)")


if __name__ == "__main__":
    main()
