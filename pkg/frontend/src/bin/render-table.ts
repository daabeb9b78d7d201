#!/usr/bin/env node
import { runTable } from "../cli.js";

process.exit(runTable(process.argv.slice(2)));
